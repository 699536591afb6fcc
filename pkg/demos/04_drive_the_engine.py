"""Drive the streaming engine frame by frame, like a live session would.

Feeds gaze one frame at a time, watches the warm-up, then prints each cut as
it is decided. This is the same engine the WebSocket gateway runs per session;
`python -m gazecut.gateway --fixtures <dir> --static frontend` serves it to
the browser console where your pointer becomes the gaze source.
"""
import numpy as np

from gazecut.ingest import default_params
from gazecut.selector import OnlineEngine
from gazecut.synth import synth_scene

tracks, gaze, _ = synth_scene(seed=9, n_actors=3, frames=700)
params = default_params(tracks.clip)
engine = OnlineEngine(tracks, params)

print(f"look-ahead {params.lookahead_frames} frames, smoothing lag "
      f"{params.filter.w_future} frames; decisions start once both are warm\n")

decided = 0
for frame_samples in gaze.frames:
    pts = np.array([[s.x, s.y] for s in frame_samples]).reshape(-1, 2)
    event = engine.push_frame(pts)
    if event is None:
        continue
    if decided == 0:
        print(f"first decision arrived while ingesting frame {engine.in_frame - 1}")
    decided += 1
    if event.cut or decided == 1:
        d = event.decision
        print(f"frame {d.frame:4d}: shot {d.shot_id} "
              f"(crop {d.crop.w:.0f}x{d.crop.h:.0f} at {d.crop.x:.0f},{d.crop.y:.0f})"
              + ("  [cut]" if event.cut else "  [opening]"))
for event in engine.finish():
    decided += 1
    if event.cut:
        d = event.decision
        print(f"frame {d.frame:4d}: shot {d.shot_id} (drained)  [cut]")

edl = engine.to_edl()
print(f"\n{decided} decisions, {len(edl.decisions)} frames covered, "
      f"shot timer ends at {engine.state.shot_timer}")
