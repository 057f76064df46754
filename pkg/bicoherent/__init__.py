"""Deformed two-mode coherent states and their uncertainty relations."""
