from setuptools import setup

with open("README.md") as file:
    long_description = file.read()

setup(
    name="macauthpy",
    version="0.1.0",
    description="Physical-layer authentication over DM-MACs: analysis and simulation.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=["macauthpy", "macauthpy.models"],
    package_data={"macauthpy": ["data/*.json"]},
    install_requires=["numpy", "pandas", "pydantic>=2", "pytz"],
    entry_points={"console_scripts": ["macauth=macauthpy.cli:main"]},
    keywords=["python", "information theory", "authentication", "multiple-access channel"],
)
