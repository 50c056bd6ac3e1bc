import numpy as np
import pytest

from ricci_qc.geometry import ClassId, ClassParams, InitialData

# one valid parameter set per class for tests that do not care about the values
DEFAULT_PARAMS = {
    ClassId.A1: ClassParams(),
    ClassId.A2iv: ClassParams(k=2.0),
    ClassId.A3: ClassParams(k=1.0),
    ClassId.A4: ClassParams(),
    ClassId.A5: ClassParams(),
    ClassId.A6: ClassParams(),
    ClassId.A7i: ClassParams(),
    ClassId.A7ii: ClassParams(a2=0.0),
    ClassId.A8: ClassParams(),
    ClassId.A9ii: ClassParams(a3=1.0),
}

UNIT = InitialData(1.0, 1.0, 1.0, 1.0)
ALL_CLASSES = list(ClassId)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
