from setuptools import find_packages, setup

setup(
    name="deepqna",
    version="0.1.0",
    packages=find_packages(include=["deepqna", "deepqna.*"]),
    package_data={"deepqna.data": ["*.decomp", "*.mock"]},
)
