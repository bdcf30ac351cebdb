"""Tests package for the {g,h}-derivation verifier"""
