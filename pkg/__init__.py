"""
lmx - Matrix Lauricella and Srivastava Series Toolkit
Series evaluation, integral representations and PDE system checks
"""

__version__ = '1.0.0'
__author__ = 'lmx developers'
