import streamlit as st
import numpy as np
import pandas as pd
from dark_zeno.errors import ConfigurationError, DarkZenoError
from dark_zeno.paths import ModePath, period_of
from dark_zeno.spectrum import ZenoSpectrum, cyclic_return_fidelity, three_level_frequencies, zeno_spectrum
from utils.forms import parse_numbers
from utils.styling import apply_custom_styling, complex_table
import logging

logger = logging.getLogger(__name__)
apply_custom_styling()


def spectrum_page():
    st.title("🔢 Zeno spectrum")
    st.markdown(
        "Three-level path |f(t)⟩ = Σ a_j e^{−iΩ_j t}|j⟩ with H = 0. The dark dynamics in the "
        "co-moving frame have two frequencies ω± = (ξ ± √(ξ² − 4η))/2."
    )

    col1, col2 = st.columns(2)
    with col1:
        amplitudes_text = st.text_input("Amplitudes a_j (normalized for you)", "1, 1, 1")
    with col2:
        frequencies_text = st.text_input("Frequencies Ω_j", "0, 1, 2")

    try:
        a = parse_numbers(amplitudes_text, "Amplitudes", 3)
        omega = parse_numbers(frequencies_text, "Frequencies", 3)
        if not np.any(a):
            raise ConfigurationError("Amplitudes: at least one must be non-zero")
        a = a / np.linalg.norm(a)

        result = three_level_frequencies(a, omega)
        path = ModePath(amplitudes=a, frequencies=omega)
        generator = path.to_generator_path()
        numerical = zeno_spectrum(np.zeros((3, 3)), generator.K, generator.f0, np.zeros(3))

        metric_col1, metric_col2, metric_col3 = st.columns(3)
        with metric_col1:
            st.metric("ω₊ (formula)", f"{result.omega_plus:.10f}")
        with metric_col2:
            st.metric("ω₋ (formula)", f"{result.omega_minus:.10f}")
        with metric_col3:
            # P(0)(H - K)P(0) carries the opposite sign of the formula frequencies
            gap = np.max(np.abs(np.sort(-numerical.omegas) - np.array([result.omega_minus, result.omega_plus])))
            st.metric("max |formula − diagonalization|", f"{gap:.2e}")

        st.subheader("Spectrum")
        st.dataframe(
            pd.DataFrame({
                "formula": [result.omega_minus, result.omega_plus],
                "diagonalization of P(0)KP(0)": np.sort(-numerical.omegas),
            }),
            hide_index=True,
        )
        st.caption(f"ξ = {result.xi:.10g}, η = {result.eta:.10g}")

        st.subheader("Co-moving modes")
        st.dataframe(
            complex_table(numerical.modes.T, [f"ω = {w:.6f}" for w in numerical.omegas]),
            hide_index=True,
        )

        period = period_of(path)
        if period.is_periodic:
            # equal-weight superposition of the two modes
            psi0 = numerical.modes.sum(axis=1) / np.sqrt(2.0)
            balanced = ZenoSpectrum(
                omegas=numerical.omegas,
                modes=numerical.modes,
                coefficients=numerical.modes.conj().T @ psi0,
            )
            fidelity = cyclic_return_fidelity(balanced, period)
            st.metric("Path period T", f"{period.period:.10f}")
            st.metric("Return fidelity² after one period (c± = 1/√2)", f"{fidelity**2:.6f}")
        else:
            st.info(f"The path is {period}: no cyclic return")

    except DarkZenoError as e:
        logger.error(f"Spectrum error: {str(e)}")
        st.error(f"Cannot compute the spectrum: {str(e)}")


if __name__ == "__main__":
    spectrum_page()
