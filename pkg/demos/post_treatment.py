import os
import sys
import json
import pandas as pd

path = sys.argv[1] if len(sys.argv) > 1 else 'output.d'

dfs = []
checks = []

for (dirpath, dirnames, filenames) in os.walk(path):
    if 'report.json' in filenames:
        with open(os.path.join(dirpath, 'report.json')) as json_file:
            results = json.load(json_file)

        name = open(os.path.join(dirpath, 'name.txt')).read()
        counts = {'pass': 0, 'fail': 0, 'inconclusive': 0}
        for c in results['checks']:
            counts[c['status']] += 1
            checks.append({'name': name, 'check': c['name'], 'status': c['status'],
                           'message': c['message']})
        data = {'name': name,
                'command': results['command'],
                'status': results['status'],
                **counts,
        }
        if results['command'] == 'riesz':
            sub = results['results']['subsequences']
            data.update({'limit_k': sub['limit_k'], 'limit_q': sub['limit_q'],
                         'recurrence_gap': sub['recurrence_gap']})
        dfs.append(data)

df = pd.DataFrame(dfs)
print(df.to_latex(index=False))

if checks:
    # one row per case, one column per check
    matrix = pd.DataFrame(checks).pivot_table(index='name', columns='check', values='status',
                                              aggfunc='first')
    matrix.to_csv(os.path.join(path, 'matrix.csv'))
    print(matrix.fillna('').to_string())
