# Verifier for p-concavity of elliptic solutions and the mean-width rearrangement
