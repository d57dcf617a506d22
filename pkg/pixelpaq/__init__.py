"pixelpaq: JND-based luma and chroma perceptual quantisation."

__version__ = '1.0.0'
