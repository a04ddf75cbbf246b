# Keeps this directory on sys.path so tests can import the shared oracles
# module without packaging it.
