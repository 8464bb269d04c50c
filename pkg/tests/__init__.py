"""Tests package for the Deep Prior Video Quality package"""
