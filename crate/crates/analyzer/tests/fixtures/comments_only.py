# first comment
# second comment
#
