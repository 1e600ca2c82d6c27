#!/usr/bin/env python
"""
Setup.py distribution file for tdsp-reduce.
"""
# std imports
import os
import codecs

# 3rd party
import setuptools


def _get_here(fname):
    return os.path.join(os.path.dirname(__file__), fname)


def main():
    """Setup.py entry point."""
    setuptools.setup(
        name='tdsp_reduce',
        version='0.1.0',
        description=(
            "Exact end-to-end arrival functions of time-dependent networks "
            "by tree-decomposition guided graph reduction"),
        long_description=codecs.open(
            _get_here('README.rst'), 'rb', 'utf8').read(),
        install_requires=('blessed<2', 'PyYaml<7', 'networkx>=2.6', 'tabulate'),
        extras_require={
            'tests': ['pytest', 'hypothesis'],
        },
        license='MIT',
        packages=['tdsp_reduce'],
        package_data={
            '': ['LICENSE', '*.rst', '*.txt'],
        },
        include_package_data=True,
        zip_safe=True,
        python_requires='>=3.8',
        classifiers=[
            'Intended Audience :: Science/Research',
            'Natural Language :: English',
            'Development Status :: 3 - Alpha',
            'Environment :: Console',
            'License :: OSI Approved :: MIT License',
            'Operating System :: POSIX',
            'Programming Language :: Python :: 3.8',
            'Programming Language :: Python :: 3.9',
            'Programming Language :: Python :: 3.10',
            'Programming Language :: Python :: 3.11',
            'Programming Language :: Python :: 3.12',
            'Topic :: Scientific/Engineering :: Mathematics',
        ],
        entry_points={
            'console_scripts': ['tdsp-reduce=tdsp_reduce:main'],
        },

        keywords=[
            'arrival-function',
            'fifo',
            'piecewise-linear',
            'shortest-path',
            'star-mesh',
            'time-dependent',
            'treewidth',
            'wye-delta',
        ],
    )


if __name__ == '__main__':
    main()
