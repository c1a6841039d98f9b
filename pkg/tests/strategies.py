"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from lecam_equiv.funclass import FourierFunction

coeff = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def fourier_functions(draw, d=1, max_freq=20, max_terms=6):
    ls = draw(
        st.lists(
            st.tuples(*[st.integers(-max_freq, max_freq)] * d),
            min_size=1,
            max_size=max_terms,
            unique=True,
        )
    )
    cs = draw(st.lists(coeff, min_size=len(ls), max_size=len(ls)))
    return FourierFunction(d, np.array(ls), np.array(cs))
