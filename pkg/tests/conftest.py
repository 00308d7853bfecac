import numpy as np
import pytest

from radonsource import (
    Disk,
    FieldTensor,
    Provenance,
    SensorArray,
    ShapeSum,
    WavenumberGrid,
    disk_field_closed_form,
)


@pytest.fixture(scope="session")
def unit_disk():
    return ShapeSum(((Disk((0.0, 0.0), 1.0), 1.0),))


def closed_form_tensor(sensors: SensorArray, kgrid: WavenumberGrid) -> FieldTensor:
    """Field tensor for the unit disk built from the analytic solution,
    independent of the raster quadrature."""
    values = np.empty((sensors.count, kgrid.count), dtype=np.complex128)
    for m, k in enumerate(kgrid.ks()):
        values[:, m] = disk_field_closed_form(float(k), 1.0, 1.0, sensors.radius)
    return FieldTensor(sensors, kgrid, values, Provenance("clean"))


@pytest.fixture(scope="session")
def disk_tensor_60_300():
    """Unit-disk data at L=60, k in [0.1, 30], dk=0.1."""
    return closed_form_tensor(SensorArray(5.0, 60), WavenumberGrid(0.1, 0.1, 300))
