#!/usr/bin/env python
"Setuptools params"

from setuptools import setup
from os.path import join

# Get version number from source tree
import sys

sys.path.append('.')
from pixelpaq import __version__  # noqa: E402

scripts = [join('bin', filename) for filename in ['pixelpaq']]

modname = distname = 'pixelpaq'

setup(
    name=distname,
    version=__version__,
    description=
    'JND-based luma and chroma perceptual quantisation for raw YCbCr video.',
    packages=['pixelpaq'],
    long_description="""
        pixelpaq derives per coding block luma and chroma QPs from
        just-noticeable-distortion weights, simulates a transform coder to
        measure their effect and compares QP strategies side by side.
        """,
    classifiers=[
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python :: 3",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Multimedia :: Video",
    ],
    keywords='video coding quantisation JND HEVC chroma',
    license='BSD',
    python_requires='>=3.8',
    install_requires=['setuptools', 'numpy', 'scipy', 'Pillow'],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['pixelpaq = pixelpaq.cli:main']},
    scripts=scripts,
)
