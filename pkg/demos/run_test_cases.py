import os
import subprocess
from textwrap import dedent


def run_case(path, command, specs, horizon, pmax, nmax, option):

    with open('options.txt', 'w') as f:
        f.writelines(dedent(f"""
        -horizon {horizon}
        -construct_pmax {pmax}
        -riesz_nmax {nmax}
        -no_timestamp
        -out {path}/report.json
        -csv {path}/table.csv
        {option}
        """))

    print(f"proxseq {command} {' '.join(specs)} -options_file options.txt")
    result = subprocess.run(["proxseq", command, *specs, "-options_file", "options.txt"],
                            capture_output=True)
    if result.stderr:
        with open(f"{path}/stderr_execution.txt", 'w') as f:
            f.write(result.stderr.decode('utf-8'))
    with open(f"{path}/output_execution.txt", 'w') as f:
        f.write(result.stdout.decode('utf-8'))
    with open(f"{path}/returncode.txt", 'w') as f:
        f.write(str(result.returncode))


case = 1

if case == 1: # property checks of the named families
    command = 'analyze'
    specs = [['gevrey:0.5'], ['gevrey:1'], ['configs/example_a.json'], ['configs/example_b.json'],
             ['example_riesz'], ['m_q:2'], ['configs/m_zero_beta.json']]
    horizon = [2**20]
    pmax = [512]
    nmax = [12]
elif case == 2: # construction from proximate orders
    command = 'construct'
    specs = [['const:0.5'], ['const:2'], ['configs/rho_alpha_beta.json'], ['power_decay:1:1'],
             ['configs/expr_order.json']]
    horizon = [0]
    pmax = [128, 512, 2048]
    nmax = [12]
elif case == 3: # admissibility and its closure chain
    command = 'admit'
    specs = [['gevrey:1', 'const:1'], ['example_a', 'const:1'], ['example_b', 'const:1'],
             ['gevrey:2', 'rho_alpha_beta:2:0']]
    horizon = [0]
    pmax = [512]
    nmax = [12]
elif case == 4: # Riesz means of the counterexample
    command = 'riesz'
    specs = [[]]
    horizon = [0]
    pmax = [512]
    nmax = [6, 12, 20]

options = [('default', ""),
           #('verbose', "-props_verbose True \n-regvar_verbose True \n-construct_verbose True"),
]

if not os.path.exists('output.d'):
    os.mkdir('output.d')

for name, option in options:
    for spec in specs:
        for h in horizon:
            for pm in pmax:
                for nm in nmax:
                    label = '_'.join(os.path.splitext(os.path.basename(s))[0].replace(':', '-') for s in spec) or 'counterexample'
                    path = f'output.d/case_{case}_{name}_{command}_' + '_'.join([str(el) for el in [label, h, pm, nm]])

                    if not os.path.exists(path):
                        os.mkdir(path)

                    with open(os.path.join(path, 'name.txt'), 'w') as f:
                        f.write(' '.join([command] + spec))

                    run_case(path, command, spec, h, pm, nm, option)
