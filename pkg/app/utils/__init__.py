"""
Utilities shared by the services.
"""
