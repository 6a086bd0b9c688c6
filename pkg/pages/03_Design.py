import streamlit as st
import numpy as np
import pandas as pd
from dark_zeno.design import ModeTrajectory, mode_design, parallel_transport_residual, pancharatnam_phase
from dark_zeno.dynamics import continuous_dark_run
from dark_zeno.errors import DarkZenoError
from dark_zeno.linalg import fidelity
from utils.forms import parse_numbers
from utils.styling import apply_custom_styling
import logging

logger = logging.getLogger(__name__)
apply_custom_styling()


def design_page():
    st.title("🎯 Inverse design")
    st.markdown(
        "Target Ψ(t) = Σ √p_j e^{−iν_j t}|j⟩ with H = 0. Dark evolution can follow it only "
        "when Σ p_j ν_j = 0; the monitored state is then f(t) ∝ Σ √p_j ν_j e^{−iν_j t}|j⟩."
    )

    col1, col2 = st.columns(2)
    with col1:
        p_text = st.text_input("Populations p_j", "0.5, 0.25, 0.25")
        T = st.number_input("Duration T", min_value=0.01, value=5.0)
    with col2:
        nu_text = st.text_input("Frequencies ν_j", "0, 2, -2")
        dt = st.number_input("Step dt", min_value=1e-5, value=1e-3, format="%.5f")

    if st.button("Design", type="primary"):
        try:
            p = parse_numbers(p_text, "Populations")
            nu = parse_numbers(nu_text, "Frequencies", p.size)
            with st.spinner("Designing and integrating..."):
                target, path = mode_design(p, nu)
                forward = continuous_dark_run(target.state_at(0.0), path, np.zeros((p.size, p.size)), T, dt)

            fidelities = [fidelity(target.state_at(t), psi) for t, psi in zip(forward.times, forward.states)]
            st.subheader("Designed monitored state")
            st.dataframe(
                pd.DataFrame({
                    "j": np.arange(p.size),
                    "amplitude": path.amplitudes.real,
                    "frequency": path.frequencies,
                }),
                hide_index=True,
            )

            metric_col1, metric_col2, metric_col3 = st.columns(3)
            with metric_col1:
                st.metric("min fidelity to target", f"{min(fidelities):.9f}")
            with metric_col2:
                st.metric("parallel-transport residual", f"{parallel_transport_residual(forward):.2e}")
            with metric_col3:
                st.metric("geometric phase", f"{pancharatnam_phase(forward):.6f}")
            st.caption(f"Σ p_j ν_j = {ModeTrajectory(p=p, nu=nu).transport_defect:.3e}")

        except DarkZenoError as e:
            logger.error(f"Design error: {str(e)}")
            st.error(f"Design rejected: {str(e)}")


if __name__ == "__main__":
    design_page()
