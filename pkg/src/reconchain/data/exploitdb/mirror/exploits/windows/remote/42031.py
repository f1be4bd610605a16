#!/usr/bin/env python
# Exploit Title: Microsoft Windows 7/2008 R2 - 'EternalBlue' SMB Remote Code Execution (MS17-010)
# EDB-ID: 42031
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
