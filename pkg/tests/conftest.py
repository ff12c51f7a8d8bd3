import pytest

from .fixtures import *
