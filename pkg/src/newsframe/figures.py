"""Render report figures next to the delimited outputs.

All rendering goes through the Agg backend and fixed figure geometry so
a rerun with identical inputs produces byte-identical PNG files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .corpus import ngram_text  # noqa: E402

_DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=_DPI, format="png")
    plt.close(fig)


def render_keyword_map(coords, path, title="Keyword map"):
    """Scatter the 2D keyword projection with one label per keyword."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    xs = [x for _, x, _ in coords]
    ys = [y for _, _, y in coords]
    ax.scatter(xs, ys, s=36, color="#1f77b4", zorder=3)
    for gram, x, y in coords:
        ax.annotate(ngram_text(gram), (x, y), textcoords="offset points",
                    xytext=(4, 4), fontsize=8)
    ax.set_xlabel("dimension 1")
    ax.set_ylabel("dimension 2")
    ax.set_title(title)
    ax.grid(True, linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    _save(fig, path)


def render_annual_series(series, path):
    """Volume bars with sentiment and correlation lines on a second axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    years = list(series.years)
    ax.bar(years, series.volume, color="#c7ddf2", edgecolor="#1f77b4",
           linewidth=0.6, label="volume")
    ax.set_xlabel("year")
    ax.set_ylabel("articles")
    ax.set_title(series.topic or "news cycle")

    ax2 = ax.twinx()
    ax2.set_ylim(-1.05, 1.05)
    ax2.set_ylabel("mean sentiment / MNC")
    for name, values, style, color in (
        ("mean sentiment", series.mean_sentiment, "o-", "#d62728"),
        ("MNC", series.mnc, "s--", "#2ca02c"),
    ):
        pts = [(y, v) for y, v in zip(years, values) if v is not None]
        if pts:
            ax2.plot([p[0] for p in pts], [p[1] for p in pts], style,
                     color=color, markersize=4, linewidth=1.2, label=name)
    if series.legislative is not None:
        for y, flag in zip(years, series.legislative):
            if flag:
                ax.axvline(y, color="#9467bd", alpha=0.35, linewidth=5, zorder=0)

    handles1, labels1 = ax.get_legend_handles_labels()
    handles2, labels2 = ax2.get_legend_handles_labels()
    ax2.legend(handles1 + handles2, labels1 + labels2, loc="upper left", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_topic_f1(per_topic, path, overall=None):
    """Horizontal bars of per-topic F1 from a leave-one-out run."""
    topics = sorted(per_topic)
    scores = [per_topic[t]["f1"] for t in topics]
    fig, ax = plt.subplots(figsize=(6, 0.6 * max(len(topics), 3) + 1.5))
    ax.barh(range(len(topics)), scores, color="#1f77b4", height=0.6)
    ax.set_yticks(range(len(topics)))
    ax.set_yticklabels(topics, fontsize=9)
    ax.set_xlim(0, 1.05)
    ax.set_xlabel("F1")
    title = "Leave-one-out F1 by topic"
    if overall is not None:
        title += f" (overall {overall:.3f})"
        ax.axvline(overall, color="#d62728", linewidth=1, linestyle="--")
    ax.set_title(title)
    ax.invert_yaxis()
    fig.tight_layout()
    _save(fig, path)


def render_posteriors(rows, path, t=None, topic=""):
    """Per-year posterior under the quiet-cycle model, log scale."""
    fig, ax = plt.subplots(figsize=(7, 4))
    years = [r[0] for r in rows]
    probs = [max(r[1], 1e-12) for r in rows]
    actual = [bool(r[3]) for r in rows]
    colors = ["#d62728" if a else "#1f77b4" for a in actual]
    ax.bar(years, probs, color=colors)
    ax.set_yscale("log")
    if t is not None:
        ax.axhline(t, color="#2ca02c", linewidth=1.2, linestyle="--",
                   label=f"t = {t:g}")
        ax.legend(fontsize=8)
    ax.set_xlabel("year")
    ax.set_ylabel("P(change | quiet-cycle model)")
    ax.set_title(topic or "legislation posteriors")
    fig.tight_layout()
    _save(fig, path)
