"""Exploration toolkit for online mental-health-community corpora.

Pipeline: ingest a Reddit-style dump into an immutable store, build a
TF-IDF index, label posts/comments with social-support levels, precompute
similar-post pairs, then serve an interactive three-panel exploration API
(zoomable circle packing with support filtering, anchored note-taking
with summaries and mind maps, LLM-assisted question boards).
"""

__version__ = "0.1.0"
