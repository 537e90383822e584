"""The 9-feature signature of one synthetic talking-face clip."""

import numpy as np

from emotiontda import PLANE_LABELS, SignatureOptions, extract_signature, synth_dataset

video = synth_dataset(seed=0, per_class=1)[4]
print(video.video_id, video.frames.shape, f"{len(video.audio)} audio samples")

sig = extract_signature(video)
for name, value in zip(PLANE_LABELS + ("audio",), sig.vector):
    print(f"{name:>16s}  {value:.4f}")

# restricting the entropy to connected components
h0 = extract_signature(video, SignatureOptions(homology_dims=(0,)))
print("H0-only:", np.round(h0.vector, 4))
