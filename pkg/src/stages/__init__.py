"""Pipeline stages, one subpackage each."""
