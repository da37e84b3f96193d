from setuptools import setup, find_packages

setup(
    name = "ProxSeq",
    version="0.1",
    packages=find_packages(exclude=['tests']),
    install_requires=['numpy', 'scipy', 'sympy', 'pandas', 'mpi4py', 'petsc4py'],
    entry_points={'console_scripts': ['proxseq=ProxSeq.cli:main']},
)
