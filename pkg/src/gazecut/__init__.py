"""gazecut: real-time virtual-camera editing of wide-angle stage recordings.

The pipeline turns per-frame actor tracks plus live gaze into an edit:
candidate crops for every contiguous actor group (shotgen), fixed-lag
smoothing of crop trajectories (stabilize), gaze potentials and cinematic
penalty terms (editcost), and an online shot selector with a rolling
look-ahead cost window (selector).  A CLI (cli) and a WebSocket session
service (gateway) wrap the pipeline.
"""

__version__ = "0.1.0"
