import os
import sys
import streamlit as st
import logging

# Add the current directory to Python path
current_dir = os.path.dirname(os.path.abspath(__file__))
if current_dir not in sys.path:
    sys.path.append(current_dir)

from dark_zeno import __version__
from dark_zeno.config import PROFILES
from utils.styling import apply_custom_styling

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Page config
st.set_page_config(
    page_title="Dark Zeno Explorer",
    page_icon="🌑",
    layout="centered"
)

apply_custom_styling()


def main():
    st.title("Dark Zeno Explorer")
    st.caption(f"dark_zeno {__version__}")

    st.markdown("""
    ### What this is
    A system monitored by repeated measurements of a moving state |f(t)⟩, conditioned
    on every outcome being negative, evolves inside the subspace orthogonal to |f(t)⟩.
    In the limit of frequent measurements that evolution is unitary and is generated
    by the effective Hamiltonian

    H_D = P H P + i(|ḟ⟩⟨f| − |f⟩⟨ḟ|),  P = I − |f⟩⟨f|.

    The same dynamics appear without measurements when |f(t)⟩ carries a large
    energy shift E.
    """)

    st.markdown("### Pages")
    menu_col1, menu_col2 = st.columns(2)

    with menu_col1:
        st.markdown("""
        - 🔢 **Spectrum**: three-level Zeno frequencies, formula against diagonalization
        - ▶️ **Dark run**: run a scenario file, inspect and download the trajectory
        """)

    with menu_col2:
        st.markdown("""
        - 🎯 **Design**: choose f(t) so that dark evolution follows a prescribed state
        """)

    st.markdown("### Tolerance profiles")
    st.dataframe(
        [{"profile": name, **{k: v for k, v in vars(tol).items() if k in ("orthogonality_setup", "compatibility", "period")}}
         for name, tol in PROFILES.items()],
        hide_index=True,
    )


if __name__ == "__main__":
    main()
