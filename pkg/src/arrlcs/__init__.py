"""Exact lower-central-series invariants of line-arrangement groups.

The package computes, over the integers, the degree-2 and degree-3
graded pieces of the lower central series of an arrangement group
presented from abstract configuration data, and evaluates the
obstruction class that distinguishes glued MacLane arrangements.
"""

__version__ = "0.1.0"
