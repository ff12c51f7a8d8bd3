from .eigenstrata import *
