"""Workbench for eliciting and debugging SLEEC normative requirements."""

__version__ = "0.1.0"
