import os
from setuptools import find_packages
from setuptools import setup

with open(os.path.join("dcgrid", "VERSION")) as file:
    version = file.read().strip()

with open("README.rst") as file:
    long_description = file.read()


setup(
    name="dcgrid-stability",
    description="Large- and small-signal stability analysis of DC microgrids with constant power loads",
    long_description=long_description,
    license="Apache License 2.0",
    version=version,
    keywords="dc microgrid constant power load stability mixed potential lyapunov droop",
    packages=find_packages(include=["dcgrid*"]),
    package_dir={"dcgrid": "dcgrid"},
    package_data={"dcgrid": ["VERSION"]},
    include_package_data=True,
    zip_safe=False,
    install_requires=["numpy", "scipy", "toml", "jmespath"],
    entry_points={"console_scripts": ["dcgrid = dcgrid.cli:main"]},
    python_requires=">=3.7",
    platforms="Platform Independent",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Education",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
