from setuptools import setup

setup(
    name='fracplap',
    version='1.0.0',
    packages=[
        'fracplap',
        'fracplap/config',
        'fracplap/pv',
        'fracplap/space',
        'fracplap/viscosity',
        'fracplap/weak',
    ],
    install_requires=[
        'numpy',
        'pyyaml',
        'scipy',
    ],
    scripts=[
        'scripts/fracplap',
    ],
)
