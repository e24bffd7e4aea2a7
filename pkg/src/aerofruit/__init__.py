"""UAV orchard fruit detection toolkit.

Subpackages:

* ``geometry``  -- closed-form flight planning for oblique/vertical capture
* ``datakit``   -- tiling, splitting, augmentation, synthetic orchard data
* ``nnblocks``  -- the detector's building blocks (reparam convs, attention)
* ``detector``  -- model assembly, decode, NMS, target assignment, loss
* ``metrics``   -- detection evaluation, complexity counting, benchmarks
* ``harness``   -- training loop, evaluation driver, ablation grid
"""

__version__ = "0.1.0"
