from setuptools import setup, find_packages
import os

name = "lp_decoder"
version = "0.1.0"


def read(*rnames):
    return open(os.path.join(os.path.dirname(__file__), *rnames)).read()


setup(
    name=name,
    version=version,
    description="Interior-point LP decoding of binary linear codes",
    long_description=read('README.md'),
    classifiers=[],
    keywords="ldpc lp-decoding interior-point belief-propagation",
    author="",
    author_email='',
    url='',
    license='MIT',
    package_dir={'': 'src'},
    packages=find_packages('src'),
    py_modules=['run', 'scripts'],
    include_package_data=True,
    zip_safe=False,
    install_requires=[
        'setuptools',
        'Flask',
        'numpy',
        'scipy',
        'requests',
        'mock',
    ],
    entry_points={
        'console_scripts': [
            'lp_decoder = lp_decoder.cli:main',
            'download_alist = scripts:download_alist',
            'lp_decoder_server = run:main',
        ]
    },
)
