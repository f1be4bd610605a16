#!/usr/bin/env python
from impacket import smb

def main():
    pass
