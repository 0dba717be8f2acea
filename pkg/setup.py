#!/usr/bin/env python3
import os
from setuptools import setup


# Utility function to read the README file.
# Used for the long_description.  It's nice, because now 1) we have a top level
# README file and 2) it's easier to type in the README file than to put a raw
# string in below ...
def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()


if not os.path.exists('build'):
    os.mkdir('build')
scripts = (
    'ablate.py',
    'clean.sh',
    'evaluate.py',
    'gradcheck.py',
    'ingest.py',
    'plot_loss.py',
    'recommend.py',
    'synth.py',
    'train.py',
)
scripts_dist = []
for script in scripts:
    # Make script names more executable like
    dst_base = script
    dst_base = dst_base.replace('.py', '')
    dst_base = dst_base.replace('.sh', '')
    dst_base = dst_base.replace('_', '-')
    dst = 'build/gr-' + dst_base
    if os.path.exists(dst):
        os.unlink(dst)
    os.symlink(os.path.realpath(script), dst)
    scripts_dist.append(dst)

setup(
    name="gravrec",
    version="0.1.0",
    description=("Gravity weighted multi-channel scholar network embedding "
                 "for paper recommendation."),
    license="BSD",
    keywords="recommender graph embedding bpr scholar citation",
    packages=["gravrec", "gravrec.script"],
    scripts=scripts_dist,
    install_requires=[
        "numpy",
        "scipy",
        "psutil",
        "matplotlib",
        "python-dateutil",
    ],
    extras_require={
        "test": ["pytest"],
    },
    long_description=read('README.md'),
    classifiers=[
        "License :: OSI Approved :: BSD License",
    ],
)
