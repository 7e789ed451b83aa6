"""
Setup script for robust-xbar package.
"""

from setuptools import setup, find_packages

setup(
    name="robust-xbar",
    version="0.1.0",
    description="Robust X-bar control charts for Phase-I subgroups of unequal sizes",
    packages=find_packages(include=["robust_xbar", "robust_xbar.*"]),
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",
        "click>=8.0",
        "python-dotenv>=0.19.0",
        "matplotlib>=3.5",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
        "all": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": ["robust-xbar=robust_xbar.cli.main:main"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
)
