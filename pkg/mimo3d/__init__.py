"""3D MIMO maximum-entropy channel: Monte Carlo MI and its analytical distributions.

Run `python -m mimo3d --help` for the validation and sweep commands.
"""
