"""Embedded reference data"""

from core.errors import DataInputError
from core.types import MacroObservation, MacroSeries

# Broad money (M3), real GDP and CPI growth of China, percent per year
CHINA_ROWS = (
    (2002, 16.8, 9.1, -0.8),
    (2003, 19.9, 10.0, 1.2),
    (2004, 16.4, 10.1, 3.9),
    (2005, 16.0, 11.4, 1.8),
    (2006, 16.8, 12.7, 1.5),
    (2007, 17.5, 14.2, 4.8),
    (2008, 16.5, 9.7, 5.9),
    (2009, 26.2, 9.4, -0.7),
    (2010, 20.9, 10.6, 3.3),
    (2011, 15.7, 9.5, 5.4),
    (2012, 17.3, 7.9, 2.6),
    (2013, 14.8, 7.8, 2.6),
    (2014, 12.8, 7.3, 2.0),
    (2015, 11.8, 6.9, 1.4),
    (2016, 12.1, 6.7, 2.0),
)

FIXTURES = ("china",)


def china_fixture() -> MacroSeries:
    """China 2002-2016, country code CHN"""
    return MacroSeries(
        tuple(MacroObservation(period=p, q=q, g=g, c=c) for p, q, g, c in CHINA_ROWS),
        country="CHN",
    )


def load_fixture(name: str) -> MacroSeries:
    if name == "china":
        return china_fixture()
    raise DataInputError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
