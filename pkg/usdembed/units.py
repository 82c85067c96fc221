"""
Natural units for usdembed
==========================

All quantities use hbar = 1. Energies are measured in ``energy`` and times in
``time``, chosen so that ``energy * time`` is an angle in radians.
"""
from typing import Union
from astropy import units as u

energy = u.def_unit(
    s=['Enat', 'energy_nat'],
    doc='natural energy unit (hbar = 1)'
)
time = u.def_unit(
    s=['tnat', 'time_nat'],
    represents=u.rad / energy,
    doc='natural time unit, the inverse of ``energy`` in radians'
)
action = u.rad

u.add_enabled_units([energy, time])


def to_natural(value: Union[float, u.Quantity], unit: u.Unit) -> float:
    """
    Strip the unit from a value given either as a float (assumed natural units)
    or as an astropy Quantity.

    Parameters
    ----------
    value : float or astropy.units.Quantity
        The value to convert.
    unit : astropy.units.Unit
        The natural unit to express ``value`` in.

    Returns
    -------
    float
        The value in ``unit``.

    Examples
    --------
    >>> to_natural(2.0, time)
    2.0
    """
    if isinstance(value, u.Quantity):
        return value.to_value(unit)
    return float(value)
