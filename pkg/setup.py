from setuptools import setup, find_packages

setup(
    name="fastonn",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        'numpy',
        'scipy',
        'pandas',
        'pillow',
        'pydantic',
        'pydantic-settings',
        'python-dotenv',
        'click',
        'joblib',
        'tqdm',
    ],
    entry_points={
        'console_scripts': [
            'fastonn=src.cli.main:cli',
        ],
    },
)
