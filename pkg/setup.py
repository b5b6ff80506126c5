#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import codecs
from setuptools import setup


def read(fname):
    file_path = os.path.join(os.path.dirname(__file__), fname)
    return codecs.open(file_path, encoding='utf-8').read()


version = read('ergodicimpulse/__init__.py').split('\n')[0].split('=', 1)[1].strip().strip("'")


setup(
    name='ergodicimpulse',
    version=version,
    license='MIT',
    description='Optimal thresholds for ergodic impulse control of linear diffusions at Poisson signal times.',
    long_description=read('README.rst'),
    packages=['ergodicimpulse'],
    install_requires=[
        'six',
        'hookery == 1.4.0',
        'numpy >= 1.17',
        'scipy >= 1.4',
        'click',
    ],
    extras_require={
        'yaml': ['PyYAML'],
    },
    entry_points={
        'console_scripts': [
            'ergodicimpulse = ergodicimpulse.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
    ],
)
