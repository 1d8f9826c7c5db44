# Tests for the Persian carpet package
