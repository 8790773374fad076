"""Fair submodular maximization over a matroid constraint."""
