from setuptools import setup, find_packages

setup(
    name="quditsinglet",
    version="1.0.0",
    description="N-singlet ground states of permutation Hamiltonians, measurement cascades and persistency experiments",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    py_modules=["quditsinglet"],
    include_package_data=True,
    package_data={"utils": ["*.json"]},
    data_files=[("templates", ["templates/report.html"])],
    install_requires=[
        "numpy>=1.25",
        "scipy>=1.10",
        "colorama>=0.4.6",
        "tabulate>=0.9.0",
        "jinja2>=3.1.2",
        "openpyxl>=3.1.2",
    ],
    extras_require={
        "test": ["pytest>=7.4"],
    },
    entry_points={
        "console_scripts": [
            "quditsinglet=quditsinglet:cli",
        ],
    },
    classifiers=[
        "Development Status :: 5 - Production/Stable",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
)
