"""setup.py for lamtransfer"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="lamtransfer",
    version="0.1.0",
    author="lamtransfer contributors",
    description="Anticyclotomic lambda-invariant transfer between congruent modular forms",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests",)),
    package_data={"lamtransfer": ["data/*.json"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.8",
    install_requires=[
        "networkx>=3.0",
        "rich>=13.0",
    ],
    extras_require={
        "dev": ["pytest>=7.0", "pytest-cov>=4.1", "hypothesis>=6.92", "sympy>=1.12", "black>=23.0", "flake8>=6.0", "mypy>=1.7"],
    },
    entry_points={
        "console_scripts": [
            "lamtransfer=lamtransfer.__main__:main",
        ],
    },
)
