"""Striation analysis of PageRank-ordered adjacency matrices."""
