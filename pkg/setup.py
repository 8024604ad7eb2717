#!/usr/bin/env python

from setuptools import setup, find_namespace_packages
import re

VERSIONS = 'versions.yml'
VERSION = re.search(r'version: (\S+)', open(VERSIONS, encoding='utf-8')
                    .readline()).group(1)

setup(
    name="vpme-kinetic",
    version=VERSION,
    description="Particle simulator and verification harness for Vlasov-Poisson "
                "with massless electrons on the periodic torus.",
    author="vpme-kinetic contributors",
    packages=find_namespace_packages(include=[
        "plasma.vpme.core*",
        "plasma.vpme.domain*",
        "plasma.vpme.field_solver*",
        "plasma.vpme.mollifier*",
        "plasma.vpme.particles*",
        "plasma.vpme.diagnostics*",
        "plasma.vpme.transport*",
        "plasma.vpme.cli*",
    ]),
    include_package_data=True,
    install_requires=["numpy", "scipy>=1.12", "PyYAML", "packaging"],
    extras_require={
        "development": [
            "wheel", "pytest", "pytest-cov", "pytest-asyncio", "hypothesis", "flake8", "pylint"
        ]
    },
    entry_points={
        "console_scripts": [
            "vpme = plasma.vpme.cli:main",
        ],
        "vpme_initial_data": [
            "uniform_maxwellian = plasma.vpme.particles.initial_data:sample_uniform_maxwellian",
            "perturbed_maxwellian = plasma.vpme.particles.initial_data:sample_perturbed_maxwellian",
            "two_stream = plasma.vpme.particles.initial_data:sample_two_stream",
        ],
    },
    python_requires=">=3.10",
    license="GPLv3",
    platforms="Linux",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python",
        "Topic :: Scientific/Engineering :: Physics",
    ]
)
