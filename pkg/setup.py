#!/usr/bin/env python3
"""
MCF Lab - Mean Curvature Flow and Self-Expander Laboratory
Setup script for pip installation
"""

from setuptools import setup, find_packages
import os

# Read README for long description
readme_path = os.path.join(os.path.dirname(__file__), 'README.md')
if os.path.exists(readme_path):
    with open(readme_path, encoding='utf-8') as f:
        long_description = f.read()
else:
    long_description = 'Numerical laboratory for mean curvature flow and self-expanders'

setup(
    name='mcf-lab',
    version='1.0.0',
    author='MCF Lab developers',
    description='Numerical laboratory for mean curvature flow, its rescalings and self-expanders',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    py_modules=['main'],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.9',
    install_requires=[
        'plotly>=5.18.0',
        'pandas>=2.0.0',
        'numpy>=1.24.0',
        'scipy>=1.11.0',
        'sympy>=1.12.0',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'hypothesis>=6.80.0',
            'black>=23.0.0',
            'flake8>=6.0.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'mcf-lab=main:main',
        ],
    },
    include_package_data=True,
    package_data={
        '': [
            'configs/*.cfg',
        ],
    },
    keywords='mean-curvature-flow self-expander geometric-flow numerical-analysis',
)
