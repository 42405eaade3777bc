from setuptools import setup, find_packages


setup(
    name="thurston",
    packages=find_packages(exclude=("test", "test.*")),
    package_data={"thurston": ["data/*.rule"]},
    include_package_data=True,
    version="0.3.0",
    description="Exact combinatorics of expanding Thurston maps given by two-tile subdivision rules",
    zip_safe=False,
    install_requires=["toml", "tqdm", "numpy"],
    entry_points={"console_scripts": ["thurston=thurston.cli:main"]},
    python_requires=">=3.10",
    license="Apache-2.0",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
    ],
)
