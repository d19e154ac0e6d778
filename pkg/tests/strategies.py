"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from galcasimir.polyring import MultiPoly, VarTable

rationals = st.builds(
    Fraction,
    st.integers(min_value=-20, max_value=20),
    st.integers(min_value=1, max_value=10),
)


@st.composite
def polys(draw, n=2, max_terms=6, max_exp=3):
    vt = VarTable.for_n(n)
    terms = draw(
        st.lists(
            st.tuples(
                st.dictionaries(
                    st.integers(min_value=0, max_value=vt.dim - 1),
                    st.integers(min_value=1, max_value=max_exp),
                    max_size=3,
                ),
                rationals,
            ),
            max_size=max_terms,
        )
    )
    return MultiPoly.from_terms(vt, terms)


def points(n=2):
    dim = VarTable.for_n(n).dim
    return st.lists(rationals, min_size=dim, max_size=dim)
