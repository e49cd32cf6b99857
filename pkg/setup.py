from setuptools import find_packages, setup


def read_file(file):
    with open(file) as fin:
        return fin.read()


setup(
    name="lrpossib",
    version="0.1.0",
    description="Likelihood-ratio possibility measures for statistical hypotheses",
    long_description=read_file("README.md"),
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=read_file("requirements.txt").strip().split("\n"),
    entry_points={"console_scripts": ["lrpossib = lrpossib.__main__:main"]},
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.9",
    keywords="lrpossib",
    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Intended Audience :: Science/Research",
        "Natural Language :: English",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    test_suite="tests",
)
