from setuptools import setup, find_packages


setup(
    name="bosonstar",
    license='MIT',
    version="0.1.0",
    python_requires='>=3.8',
    description="Radial pseudospectral ground states and verification suite for the massless boson star equation",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=("bosonstar",)),
    package_data={"bosonstar": ["schemas.jsonc"]},
    install_requires=["numpy", "scipy", "tqdm"],
    extras_require={"tests": ["pytest"]},
    entry_points={"console_scripts": ["bosonstar = bosonstar.cli:main"]},
)
