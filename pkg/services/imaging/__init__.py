"""Grayscale image ingestion and reconstruction output."""
