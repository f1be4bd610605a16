#!/usr/bin/env python
# Exploit Title: Microsoft Windows 7/8.1/2008 R2/2012 R2/2016 R2 - 'EternalBlue' SMB Remote Code Execution (MS17-010)
# EDB-ID: 42315
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
