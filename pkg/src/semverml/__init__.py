"""semverml: mine a package's release history and classify each release
as major, minor, or patch.

The pipeline has four stages, each usable on its own:

1. ``semverml.mining``   -- turn a repository + registry metadata into a
   canonical on-disk store and link releases to commit windows.
2. ``semverml.treediff`` / ``semverml.jsparse`` -- diff release source
   snapshots into fine-grained change-type counters.
3. ``semverml.features`` -- assemble the 41-feature vector per release
   and persist datasets as CSV.
4. ``semverml.ml``       -- classifiers, resampling, cross-validation,
   ranking metrics and the statistical comparisons used for evaluation.

``semverml.cli`` ties the stages together behind one command.
"""

__version__ = "0.1.0"
