import pandas as pd
import streamlit as st


def apply_custom_styling():
    st.markdown("""
        <style>
        /* Numbers line up in tables and metrics */
        .stDataFrame, [data-testid="stMetricValue"], code {
            font-family: 'JetBrains Mono', 'Fira Code', monospace !important;
            font-variant-numeric: tabular-nums;
        }

        /* Header styling */
        .stTitle {
            font-weight: bold;
            padding-bottom: 1rem;
            border-bottom: 2px solid #f0f2f6;
        }

        /* Metric cards */
        [data-testid="stMetric"] {
            background: white;
            padding: 0.75rem 1rem;
            border-radius: 0.5rem;
            box-shadow: 0 1px 3px rgba(0,0,0,0.1);
        }

        /* Button styling */
        .stButton button, .stDownloadButton button {
            width: 100%;
            border-radius: 0.9rem;
            font-weight: 500;
            background-color: black;
            color: white;
            border: none;
            transition: all 0.3s ease;
        }

        .stButton button:hover, .stDownloadButton button:hover {
            background-color: white;
            color: black;
            border: 1px solid black;
        }

        /* Table styling */
        .stDataFrame {
            border: 1px solid #f0f2f6;
            border-radius: 0.5rem;
        }

        /* Alert/message styling */
        .stAlert {
            padding: 1rem;
            border-radius: 0.3rem;
        }
        </style>
    """, unsafe_allow_html=True)


def complex_table(vectors, labels):
    """Rows of complex vectors as a table with re/im columns per component."""
    rows = []
    for label, vector in zip(labels, vectors):
        row = {"": label}
        for j, value in enumerate(vector):
            row[f"re_{j}"] = float(value.real)
            row[f"im_{j}"] = float(value.imag)
        rows.append(row)
    return pd.DataFrame(rows)
