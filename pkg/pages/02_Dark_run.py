import streamlit as st
import json
from pathlib import Path
from dark_zeno.artifacts import frame_to_csv, summary_to_json
from dark_zeno.config import PROFILES, get_profile
from dark_zeno.errors import ConfigurationError, DarkZenoError
from dark_zeno.runner import execute
from dark_zeno.scenario import load_scenario, parse_scenario
from utils.styling import apply_custom_styling
import logging

logger = logging.getLogger(__name__)
apply_custom_styling()

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

HEADLINE_METRICS = {
    "norm_deficit": "Norm deficit 1 − ‖Ψ‖²",
    "max_orthogonality_residual": "max |⟨f|Ψ⟩|",
    "dark_deviation": "max ‖Ψ_E − Ψ_dark‖",
    "min_round_trip_fidelity": "min round-trip fidelity",
    "cyclic_return_fidelity": "cyclic return fidelity",
}


def _load(uploaded_file, bundled):
    if uploaded_file is not None:
        try:
            data = json.loads(uploaded_file.read().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"{uploaded_file.name} is not a JSON scenario: {str(e)}")
        return parse_scenario(data, source=uploaded_file.name)
    return load_scenario(SCENARIO_DIR / bundled)


def dark_run_page():
    st.title("▶️ Dark run")

    bundled = sorted(p.name for p in SCENARIO_DIR.glob("*.json"))
    selected = st.selectbox("Bundled scenario", options=bundled)
    uploaded_file = st.file_uploader("…or upload a scenario file", type=["json"])
    profile = st.selectbox("Tolerance profile", options=sorted(PROFILES), index=sorted(PROFILES).index("default"))

    if st.button("Run", type="primary"):
        try:
            with st.spinner("Integrating..."):
                scenario = _load(uploaded_file, selected)
                frame, summary = execute(scenario, get_profile(profile))
            st.session_state.dark_run = {
                "name": scenario.source,
                "mode": scenario.run.mode,
                "csv": frame_to_csv(frame),
                "summary": summary_to_json({"mode": scenario.run.mode, **summary}),
                "frame": frame,
            }
            if scenario.sweep is not None:
                st.info("The sweep block is ignored here; run it with `dark-zeno sweep`.")
        except DarkZenoError as e:
            logger.error(f"Run error: {str(e)}")
            st.error(f"Run failed (exit code {e.exit_code}): {str(e)}")
            st.session_state.pop("dark_run", None)

    result = st.session_state.get("dark_run")
    if not result:
        return

    st.subheader(f"{Path(result['name']).name} ({result['mode']})")
    summary = json.loads(result["summary"])
    shown = [(label, summary[key]) for key, label in HEADLINE_METRICS.items() if summary.get(key) is not None]
    if shown:
        columns = st.columns(len(shown))
        for column, (label, value) in zip(columns, shown):
            with column:
                st.metric(label, f"{value:.6g}")

    with st.expander("Summary"):
        st.json(summary)

    st.dataframe(result["frame"], hide_index=True)

    col1, col2 = st.columns(2)
    with col1:
        st.download_button("Download trajectory.csv", result["csv"], file_name="trajectory.csv", mime="text/csv")
    with col2:
        st.download_button("Download summary.json", result["summary"], file_name="summary.json", mime="application/json")


if __name__ == "__main__":
    dark_run_page()
